#pragma once

#include "fihq/dataset.hpp"
#include "fihq/errors.hpp"
#include "fihq/fih.hpp"
#include "fihq/ising.hpp"
#include "fihq/json_io.hpp"
#include "fihq/optimizer.hpp"
#include "fihq/pipeline.hpp"
#include "fihq/qaoa.hpp"
