#pragma once

#include "nmpovm/basis.hpp"
#include "nmpovm/detect.hpp"
#include "nmpovm/info.hpp"
#include "nmpovm/io.hpp"
#include "nmpovm/linalg.hpp"
#include "nmpovm/measurement.hpp"
