#pragma once

// Umbrella header for the whole bench.

#include "tabadv/attacks.hpp"
#include "tabadv/chaos.hpp"
#include "tabadv/config.hpp"
#include "tabadv/dataprep.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/metrics.hpp"
#include "tabadv/numkernel.hpp"
#include "tabadv/runner.hpp"
#include "tabadv/synth.hpp"
#include "tabadv/vae.hpp"
#include "tabadv/victims.hpp"
#include "tabadv/wavenet.hpp"
