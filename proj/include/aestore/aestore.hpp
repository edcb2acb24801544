#pragma once

#include "aestore/analysis.hpp"
#include "aestore/bench.hpp"
#include "aestore/chunk_store.hpp"
#include "aestore/codec.hpp"
#include "aestore/errors.hpp"
#include "aestore/failure.hpp"
#include "aestore/gateway.hpp"
#include "aestore/keccak.hpp"
#include "aestore/lattice.hpp"
#include "aestore/manifest.hpp"
#include "aestore/repair.hpp"
#include "aestore/util.hpp"
