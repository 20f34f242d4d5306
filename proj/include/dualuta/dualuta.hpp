#pragma once

// Everything except the HTTP layer, which pulls in cpp-httplib.
#include "dualuta/algebra.hpp"
#include "dualuta/elicitation.hpp"
#include "dualuta/error.hpp"
#include "dualuta/generator.hpp"
#include "dualuta/io.hpp"
#include "dualuta/model.hpp"
#include "dualuta/oracle.hpp"
#include "dualuta/patterns.hpp"
#include "dualuta/plot.hpp"
#include "dualuta/rational.hpp"
#include "dualuta/report.hpp"
#include "dualuta/session.hpp"
