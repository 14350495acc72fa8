#pragma once

#include "ballcover/tolerance.hpp"
#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/lp.hpp"
#include "ballcover/polyhedron.hpp"
#include "ballcover/qp.hpp"
#include "ballcover/preprocess.hpp"
#include "ballcover/decision.hpp"
#include "ballcover/sequential.hpp"
#include "ballcover/instance_lab.hpp"
#include "ballcover/io.hpp"
#include "ballcover/bench.hpp"
