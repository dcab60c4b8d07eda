use monkey_sim::*;

fn main() {
    for s in builtin_scenes() {
        let z = bfs_solve(&s, &Realization::zero_crush(&s)).unwrap();
        let mut line = format!("scene {:2} {:?}/{:?} zero={:?}", s.id, s.category, s.difficulty, z.plan().map(|p| p.len()));
        if s.category == Category::DualBananas {
            for p in s.bananas() {
                let id = s.platforms[p].id.clone();
                let r = bfs_solve_with(&s, &Realization::zero_crush(&s), reaches_platform(&id), DEFAULT_STATE_CAP).unwrap();
                line += &format!(" {id}={:?}", r.plan().map(|p| p.len()));
            }
        }
        if s.category.has_crush() {
            for m in [0.5, 0.6, 0.7] {
                let r = bfs_solve(&s, &Realization::all_crush(&s, m)).unwrap();
                let subsets = Realization::enumerate(&s, m);
                let ok = subsets.iter().filter(|r| bfs_solve(&s, r).unwrap().plan().is_some()).count();
                line += &format!(" all{m}={:?} subsets {ok}/{}", r.plan().map(|p| p.len()), subsets.len());
            }
        }
        println!("{line}");
    }
}
