#pragma once

#include "ordvar/baee.hpp"
#include "ordvar/boundary.hpp"
#include "ordvar/config.hpp"
#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/estimator.hpp"
#include "ordvar/improved_sigma1.hpp"
#include "ordvar/improved_sigma2.hpp"
#include "ordvar/kubokawa_class.hpp"
#include "ordvar/quadrature.hpp"
#include "ordvar/report.hpp"
#include "ordvar/risk_engine.hpp"
#include "ordvar/rng.hpp"
#include "ordvar/sampling.hpp"
#include "ordvar/special_functions.hpp"
