#pragma once

#include "mlcoal/acceptance.hpp"
#include "mlcoal/cluster_state.hpp"
#include "mlcoal/commands.hpp"
#include "mlcoal/config.hpp"
#include "mlcoal/cost.hpp"
#include "mlcoal/embeddings.hpp"
#include "mlcoal/exact.hpp"
#include "mlcoal/experiment.hpp"
#include "mlcoal/merge_event.hpp"
#include "mlcoal/rng.hpp"
#include "mlcoal/smoluchowski.hpp"
#include "mlcoal/stats.hpp"
#include "mlcoal/table.hpp"
