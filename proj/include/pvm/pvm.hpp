#pragma once

// Umbrella header for the preset-voice matching library.

#include "pvm/audio.hpp"
#include "pvm/bench.hpp"
#include "pvm/csv.hpp"
#include "pvm/curation.hpp"
#include "pvm/dsp.hpp"
#include "pvm/errors.hpp"
#include "pvm/features.hpp"
#include "pvm/gemo.hpp"
#include "pvm/image.hpp"
#include "pvm/pipeline.hpp"
#include "pvm/pitch.hpp"
#include "pvm/preset_library.hpp"
#include "pvm/softmax.hpp"
#include "pvm/types.hpp"
#include "pvm/wav.hpp"
