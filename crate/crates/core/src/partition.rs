//! Array task sizing and block/cyclic assignment.

use serde::{Deserialize, Serialize};

use crate::config::Distribution;
use crate::discovery::WorkItem;
use crate::error::{Error, Result};

/// One array task: its 1-based index and the work items it processes, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPlan {
    pub index: usize,
    pub items: Vec<WorkItem>,
}

/// Number of array tasks for `files` inputs.
///
/// `ndata` wins over `np`; without either, every file gets its own task.
/// The count is clamped to `files` so no task is empty.
pub fn resolve_task_count(
    files: usize,
    np: Option<usize>,
    ndata: Option<usize>,
    max_array_tasks: usize,
) -> Result<usize> {
    if files == 0 {
        return Err(Error::Partition("no files to distribute".into()));
    }
    let tasks = match (ndata, np) {
        (Some(0), _) => return Err(Error::Partition("ndata must be positive".into())),
        (Some(per_task), _) => files.div_ceil(per_task),
        (None, Some(0)) => return Err(Error::Partition("np must be positive".into())),
        (None, Some(np)) => np.min(files),
        (None, None) => files,
    };
    if tasks > max_array_tasks {
        return Err(Error::TooManyTasks {
            tasks,
            limit: max_array_tasks,
        });
    }
    Ok(tasks)
}

fn check_shape(len: usize, tasks: usize) -> Result<()> {
    if tasks == 0 || tasks > len {
        return Err(Error::Partition(format!(
            "cannot split {len} items into {tasks} non-empty tasks"
        )));
    }
    Ok(())
}

/// Splits `items` into `tasks` contiguous slices whose sizes differ by at
/// most one; the first `len % tasks` slices take the extra item.
pub fn split_block<T: Clone>(items: &[T], tasks: usize) -> Result<Vec<Vec<T>>> {
    check_shape(items.len(), tasks)?;
    let base = items.len() / tasks;
    let extra = items.len() % tasks;
    let mut out = Vec::with_capacity(tasks);
    let mut start = 0;
    for t in 0..tasks {
        let size = base + usize::from(t < extra);
        out.push(items[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

/// Deals `items` round robin: item `j` lands in slice `j % tasks`.
pub fn split_cyclic<T: Clone>(items: &[T], tasks: usize) -> Result<Vec<Vec<T>>> {
    check_shape(items.len(), tasks)?;
    let mut out: Vec<Vec<T>> = (0..tasks)
        .map(|_| Vec::with_capacity(items.len().div_ceil(tasks)))
        .collect();
    for (j, item) in items.iter().enumerate() {
        out[j % tasks].push(item.clone());
    }
    Ok(out)
}

pub fn split<T: Clone>(items: &[T], tasks: usize, distribution: Distribution) -> Result<Vec<Vec<T>>> {
    match distribution {
        Distribution::Block => split_block(items, tasks),
        Distribution::Cyclic => split_cyclic(items, tasks),
    }
}

fn into_plans(groups: Vec<Vec<WorkItem>>) -> Vec<TaskPlan> {
    groups
        .into_iter()
        .enumerate()
        .map(|(i, items)| TaskPlan { index: i + 1, items })
        .collect()
}

pub fn assign_block(items: &[WorkItem], tasks: usize) -> Result<Vec<TaskPlan>> {
    split_block(items, tasks).map(into_plans)
}

pub fn assign_cyclic(items: &[WorkItem], tasks: usize) -> Result<Vec<TaskPlan>> {
    split_cyclic(items, tasks).map(into_plans)
}

pub fn assign(items: &[WorkItem], tasks: usize, distribution: Distribution) -> Result<Vec<TaskPlan>> {
    split(items, tasks, distribution).map(into_plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn task_count_examples() {
        assert_eq!(resolve_task_count(512, Some(256), None, 75_000).unwrap(), 256);
        // counting oracle: smallest t with t * 4 >= 512
        let oracle = (1..).find(|t| t * 4 >= 512).unwrap();
        assert_eq!(resolve_task_count(512, None, Some(4), 75_000).unwrap(), oracle);
        assert_eq!(oracle, 128);
        assert_eq!(resolve_task_count(5, Some(10), None, 75_000).unwrap(), 5);
        assert_eq!(resolve_task_count(7, None, None, 75_000).unwrap(), 7);
        assert_eq!(resolve_task_count(7, Some(2), Some(3), 75_000).unwrap(), 3);
    }

    #[test]
    fn task_count_over_limit() {
        let err = resolve_task_count(80_000, None, None, 75_000).unwrap_err();
        assert!(matches!(err, Error::TooManyTasks { tasks: 80_000, limit: 75_000 }));
        assert!(err.to_string().contains("--np"));
        assert_eq!(resolve_task_count(80_000, Some(100), None, 75_000).unwrap(), 100);
    }

    #[test]
    fn block_examples() {
        let six: Vec<u32> = (1..=6).collect();
        assert_eq!(split_block(&six, 2).unwrap(), vec![vec![1, 2, 3], vec![4, 5, 6]]);
        let five: Vec<u32> = (1..=5).collect();
        assert_eq!(split_block(&five, 2).unwrap(), vec![vec![1, 2, 3], vec![4, 5]]);
        let singles = split_block(&six, 6).unwrap();
        assert!(singles.iter().enumerate().all(|(i, g)| g == &vec![six[i]]));
    }

    #[test]
    fn cyclic_examples() {
        let items: Vec<usize> = (0..21).collect();
        let groups = split_cyclic(&items, 3).unwrap();
        assert_eq!(groups[0], vec![0, 3, 6, 9, 12, 15, 18]);
        assert!(groups.iter().all(|g| g.len() == 7));
        let four: Vec<usize> = (0..4).collect();
        assert_eq!(split_cyclic(&four, 2).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        let six: Vec<usize> = (0..6).collect();
        assert_eq!(split_cyclic(&six, 6).unwrap(), split_block(&six, 6).unwrap());
    }

    #[test]
    fn bad_shapes() {
        let items = [1, 2, 3];
        assert!(split_block(&items, 0).is_err());
        assert!(split_cyclic(&items, 4).is_err());
    }

    #[test]
    fn plans_are_one_based() {
        let items: Vec<WorkItem> = (0..4)
            .map(|i| WorkItem { input: format!("in/{i}").into(), output: format!("out/{i}").into() })
            .collect();
        let plans = assign(&items, 3, Distribution::Block).unwrap();
        assert_eq!(plans.iter().map(|p| p.index).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    proptest! {
        #[test]
        fn both_strategies_partition_and_balance(files in 1usize..200, t_seed in 0usize..1000) {
            let tasks = t_seed % files + 1;
            let items: Vec<usize> = (0..files).collect();
            for dist in [Distribution::Block, Distribution::Cyclic] {
                let groups = split(&items, tasks, dist).unwrap();
                prop_assert_eq!(groups.len(), tasks);
                let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
                all.sort_unstable();
                prop_assert_eq!(&all, &items);
                let max = groups.iter().map(Vec::len).max().unwrap();
                let min = groups.iter().map(Vec::len).min().unwrap();
                prop_assert!(max - min <= 1);
                prop_assert!(min >= 1);
            }
        }

        #[test]
        fn task_count_bounds(files in 1usize..10_000, np in proptest::option::of(1usize..500), ndata in proptest::option::of(1usize..500)) {
            let t = resolve_task_count(files, np, ndata, 75_000).unwrap();
            prop_assert!(t >= 1 && t <= files);
        }
    }
}
