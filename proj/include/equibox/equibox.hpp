#pragma once

#include "equibox/box_index.hpp"
#include "equibox/certifier.hpp"
#include "equibox/dickson.hpp"
#include "equibox/error.hpp"
#include "equibox/generate.hpp"
#include "equibox/gf2poly.hpp"
#include "equibox/io.hpp"
#include "equibox/measures.hpp"
#include "equibox/repdecomp.hpp"
#include "equibox/solver.hpp"
