// Umbrella header for the dec2d library.
#pragma once

#include "dec2d/error.hpp"
#include "dec2d/expression.hpp"
#include "dec2d/geometry.hpp"
#include "dec2d/local_ops.hpp"
#include "dec2d/mesh.hpp"
#include "dec2d/postprocess.hpp"
#include "dec2d/scenario.hpp"
#include "dec2d/system.hpp"
#include "dec2d/text.hpp"
