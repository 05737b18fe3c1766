#pragma once

#include "dwmf/closed_form.hpp"
#include "dwmf/error.hpp"
#include "dwmf/factorizer.hpp"
#include "dwmf/graph.hpp"
#include "dwmf/io.hpp"
#include "dwmf/matrix.hpp"
#include "dwmf/rng.hpp"
#include "dwmf/sgns.hpp"
#include "dwmf/walk_sampler.hpp"
