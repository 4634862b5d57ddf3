#pragma once

// Umbrella include for the whole library.

#include "relsim/clustering.hpp"
#include "relsim/dissimilarity.hpp"
#include "relsim/error.hpp"
#include "relsim/evaluation.hpp"
#include "relsim/hypergraph.hpp"
#include "relsim/ingest.hpp"
#include "relsim/jacobi.hpp"
#include "relsim/matrix.hpp"
#include "relsim/neighbourhood_tree.hpp"
#include "relsim/parallel.hpp"
