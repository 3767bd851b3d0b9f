#pragma once

namespace polygas {

// Worker-thread budget for the bulk loops (pair-table fills). Results are
// identical for any value: workers write disjoint slots and no cross-thread
// reductions happen.
int worker_threads();
void set_worker_threads(int n);

}  // namespace polygas
