#pragma once

#include "kepinch/certify.hpp"
#include "kepinch/regimes.hpp"
#include "kepinch/sectional.hpp"
#include "kepinch/tensor.hpp"
#include "kepinch/variational.hpp"
