// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ssvqd.hpp
 * @brief Umbrella header for the library.
 */

#pragma once

#include "ssvqd/ansatz.hpp"
#include "ssvqd/checks.hpp"
#include "ssvqd/dfo.hpp"
#include "ssvqd/drivers.hpp"
#include "ssvqd/error.hpp"
#include "ssvqd/fci.hpp"
#include "ssvqd/fockspace.hpp"
#include "ssvqd/hamio.hpp"
#include "ssvqd/orbopt.hpp"
#include "ssvqd/partial_unitary.hpp"
