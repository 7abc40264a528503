#pragma once

#include <functional>

#include "axisolve/comm.hpp"

namespace axisolve::comm {

void run_simulated(int size, CommStats& stats, const std::function<void(Comm&)>& body, const ExecutorOptions& options);
void run_threaded(int size, CommStats& stats, const std::function<void(Comm&)>& body, const ExecutorOptions& options);

}  // namespace axisolve::comm
