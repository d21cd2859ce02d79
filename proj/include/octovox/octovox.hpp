// SPDX-License-Identifier: Apache-2.0
//
// Convenience include for the whole library.

#pragma once

#include "octovox/errors.hpp"
#include "octovox/geometry.hpp"
#include "octovox/grid.hpp"
#include "octovox/io.hpp"
#include "octovox/metrics.hpp"
#include "octovox/octree.hpp"
#include "octovox/rectify.hpp"
#include "octovox/semantic_init.hpp"
#include "octovox/synth.hpp"
