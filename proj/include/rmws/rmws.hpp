#pragma once

#include <rmws/baselines.hpp>
#include <rmws/domain.hpp>
#include <rmws/error.hpp>
#include <rmws/harness.hpp>
#include <rmws/inner_solver.hpp>
#include <rmws/matrix.hpp>
#include <rmws/placement.hpp>
#include <rmws/provisioning.hpp>
#include <rmws/scenario.hpp>
#include <rmws/scheduling.hpp>
#include <rmws/suite.hpp>
#include <rmws/verification.hpp>
#include <rmws/workload.hpp>
