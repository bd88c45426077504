#pragma once

#include "medlist/cache.hpp"
#include "medlist/capture.hpp"
#include "medlist/compiler.hpp"
#include "medlist/decimal.hpp"
#include "medlist/errors.hpp"
#include "medlist/evaluation.hpp"
#include "medlist/journal.hpp"
#include "medlist/rrf.hpp"
#include "medlist/search.hpp"
#include "medlist/service.hpp"
#include "medlist/table_io.hpp"
#include "medlist/terminology.hpp"
