#pragma once

#include "errors.hpp"
#include "geometry.hpp"
#include "specialfn.hpp"
#include "quadrature.hpp"
#include "field.hpp"
#include "parallel.hpp"
#include "kernels.hpp"
#include "hyperop.hpp"
#include "dirichlet.hpp"
#include "variational.hpp"
#include "appendix.hpp"
#include "selectors.hpp"
