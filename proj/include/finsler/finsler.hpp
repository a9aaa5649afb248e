// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "finsler/catalog.hpp"
#include "finsler/common.hpp"
#include "finsler/config.hpp"
#include "finsler/expr.hpp"
#include "finsler/fields.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/geometry.hpp"
#include "finsler/jet.hpp"
#include "finsler/randers.hpp"
#include "finsler/tensor.hpp"
#include "finsler/verify.hpp"
