#pragma once

#include "laica/core/covering.hpp"
#include "laica/core/environment.hpp"
#include "laica/core/latent_space.hpp"
#include "laica/core/lipschitz.hpp"
#include "laica/core/registry.hpp"
#include "laica/core/schedule.hpp"

#include "laica/env/maze.hpp"
#include "laica/env/ngram.hpp"
#include "laica/env/tabular.hpp"

#include "laica/approx/checkpoint.hpp"
#include "laica/approx/fourier.hpp"
#include "laica/approx/gradient_check.hpp"
#include "laica/approx/optimizer.hpp"
#include "laica/approx/param_map.hpp"

#include "laica/policy/action_selector.hpp"
#include "laica/policy/bundle.hpp"
#include "laica/policy/critic.hpp"
#include "laica/policy/decision_policy.hpp"
#include "laica/policy/featurizer.hpp"
#include "laica/policy/inverse_dynamics.hpp"

#include "laica/adapt/adaptation.hpp"
#include "laica/adapt/buffer.hpp"
#include "laica/adapt/kl_objective.hpp"
#include "laica/adapt/lower_bound.hpp"

#include "laica/algorithms/direct_policy.hpp"
#include "laica/algorithms/improve.hpp"
#include "laica/algorithms/lifelong.hpp"

#include "laica/verify/bounds.hpp"
#include "laica/verify/value_iteration.hpp"
