#pragma once

#include "reglab/error.hpp"
#include "reglab/parallel.hpp"
#include "reglab/prob/sample_space.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/random_variable.hpp"
#include "reglab/regularize/growth.hpp"
#include "reglab/regularize/witness.hpp"
#include "reglab/regularize/driver.hpp"
#include "reglab/graph/bipartite_graph.hpp"
#include "reglab/graph/szemeredi.hpp"
#include "reglab/graph/report.hpp"
#include "reglab/entropy/information.hpp"
#include "reglab/entropy/set_partitions.hpp"
#include "reglab/entropy/entropy_regularize.hpp"
