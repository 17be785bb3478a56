#pragma once

#include "corrgen/chebyshev.hpp"
#include "corrgen/conic.hpp"
#include "corrgen/corridor.hpp"
#include "corrgen/engine.hpp"
#include "corrgen/error.hpp"
#include "corrgen/io.hpp"
#include "corrgen/path.hpp"
#include "corrgen/projection.hpp"
#include "corrgen/scene.hpp"
