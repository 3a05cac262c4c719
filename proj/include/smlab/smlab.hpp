#pragma once

#include "smlab/algebra.hpp"
#include "smlab/atomset.hpp"
#include "smlab/conclab.hpp"
#include "smlab/covnum.hpp"
#include "smlab/entropy.hpp"
#include "smlab/lp.hpp"
#include "smlab/metric.hpp"
#include "smlab/rational.hpp"
#include "smlab/rng.hpp"
#include "smlab/rootsum.hpp"
#include "smlab/submeasure.hpp"
