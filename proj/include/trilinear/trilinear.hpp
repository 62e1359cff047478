#pragma once

#include "trilinear/rational.hpp"
#include "trilinear/fracpoly.hpp"
#include "trilinear/univariate.hpp"
#include "trilinear/newton.hpp"
#include "trilinear/invariants.hpp"
#include "trilinear/resolve.hpp"
#include "trilinear/oscquad.hpp"
#include "trilinear/report.hpp"
