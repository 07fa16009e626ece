#ifndef BLOCKFW_BLOCKFW_HPP_
#define BLOCKFW_BLOCKFW_HPP_

#include "blockfw/bounds.hpp"
#include "blockfw/cone.hpp"
#include "blockfw/errors.hpp"
#include "blockfw/io.hpp"
#include "blockfw/linalg.hpp"
#include "blockfw/partition.hpp"
#include "blockfw/reformulate.hpp"
#include "blockfw/solver.hpp"
#include "blockfw/sos.hpp"

#endif  // BLOCKFW_BLOCKFW_HPP_
