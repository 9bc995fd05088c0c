#pragma once

#include "airscript/datastore.hpp"
#include "airscript/difviz.hpp"
#include "airscript/evalharness.hpp"
#include "airscript/fusion.hpp"
#include "airscript/nn/adam.hpp"
#include "airscript/nn/checkpoint.hpp"
#include "airscript/nn/cnn.hpp"
#include "airscript/nn/gru.hpp"
#include "airscript/nn/train.hpp"
#include "airscript/pipeline.hpp"
#include "airscript/quat.hpp"
#include "airscript/ranked.hpp"
#include "airscript/render.hpp"
#include "airscript/rng.hpp"
#include "airscript/synthgen.hpp"
#include "airscript/tensor.hpp"
