#pragma once

#include "influence/clustering.hpp"
#include "influence/corpus.hpp"
#include "influence/embedding.hpp"
#include "influence/error.hpp"
#include "influence/graph.hpp"
#include "influence/graph_io.hpp"
#include "influence/metrics.hpp"
#include "influence/netbuild.hpp"
