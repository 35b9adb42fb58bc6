#pragma once

#include "dcim/rng.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/cascade.hpp"
#include "dcim/spread.hpp"
#include "dcim/oracle.hpp"
#include "dcim/policies.hpp"
#include "dcim/io.hpp"
#include "dcim/experiment.hpp"
