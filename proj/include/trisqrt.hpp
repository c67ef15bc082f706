#pragma once

#include "trisqrt/errors.hpp"
#include "trisqrt/arith.hpp"
#include "trisqrt/linalg.hpp"
#include "trisqrt/numfield.hpp"
#include "trisqrt/ntt.hpp"
#include "trisqrt/qexp.hpp"
#include "trisqrt/modforms.hpp"
#include "trisqrt/hida.hpp"
#include "trisqrt/identity.hpp"
#include "trisqrt/measures.hpp"
#include "trisqrt/lfunc.hpp"
