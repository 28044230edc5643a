#pragma once

#include "lipcausal/connection.hpp"
#include "lipcausal/curve.hpp"
#include "lipcausal/errors.hpp"
#include "lipcausal/filippov.hpp"
#include "lipcausal/inequalities.hpp"
#include "lipcausal/lorentz.hpp"
#include "lipcausal/maximality.hpp"
#include "lipcausal/metric_field.hpp"
#include "lipcausal/metrics_zoo.hpp"
#include "lipcausal/regularity.hpp"
#include "lipcausal/types.hpp"
#include "lipcausal/version.hpp"
