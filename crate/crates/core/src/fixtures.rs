//! Small hand-checkable instances used by tests, examples and the CLI.

use crate::instance::Instance;

/// One job, one machine, one AGV: `p = 5`, `t(load, M1) = 2`,
/// `t(M1, unload) = 3`. The only schedule has makespan 10.
pub fn i1() -> Instance {
    Instance::new(
        "I1",
        0,
        1,
        vec![vec![0]],
        vec![vec![5, 0]],
        // load, unload, M1
        vec![
            0, 4, 2, //
            4, 0, 4, //
            4, 3, 0,
        ],
    )
    .expect("I1 is valid")
}

/// Two jobs on two machines with two AGVs. Job 0 visits `M1, M2`, job 1
/// visits `M2, M1`.
pub fn i2() -> Instance {
    Instance::new(
        "I2",
        0,
        2,
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![3, 2, 0], vec![1, 4, 0]],
        // load, unload, M1, M2
        vec![
            0, 5, 1, 1, //
            5, 0, 5, 5, //
            2, 3, 0, 2, //
            2, 3, 2, 0,
        ],
    )
    .expect("I2 is valid")
}
