#pragma once

#include <dchaos/distance.hpp>
#include <dchaos/interval_map.hpp>
#include <dchaos/shift.hpp>
