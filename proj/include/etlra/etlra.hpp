#ifndef ETLRA_ETLRA_HPP
#define ETLRA_ETLRA_HPP

#include "etlra/common.hpp"
#include "etlra/random.hpp"
#include "etlra/fft.hpp"
#include "etlra/tensoring.hpp"
#include "etlra/transform.hpp"
#include "etlra/sketch.hpp"
#include "etlra/lra.hpp"
#include "etlra/leverage.hpp"
#include "etlra/oracle.hpp"
#include "etlra/reduction.hpp"
#include "etlra/instances.hpp"
#include "etlra/io.hpp"

#endif  // ETLRA_ETLRA_HPP
