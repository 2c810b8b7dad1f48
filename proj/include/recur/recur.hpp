#pragma once

#include "recur/array.hpp"
#include "recur/bitseq.hpp"
#include "recur/certificate.hpp"
#include "recur/dyadic.hpp"
#include "recur/error.hpp"
#include "recur/geometry.hpp"
#include "recur/kurtz.hpp"
#include "recur/martin_lof.hpp"
#include "recur/measure.hpp"
#include "recur/multidim.hpp"
#include "recur/recurrence.hpp"
#include "recur/rotation.hpp"
#include "recur/schnorr.hpp"
