use monkey_sim::*;

#[test]
fn every_scene_is_solvable_without_crushing() {
    for s in builtin_scenes() {
        let r = Realization::zero_crush(&s);
        let plan = bfs_solve(&s, &r).unwrap().plan().cloned().unwrap_or_else(|| panic!("scene {} unsolvable", s.id));
        let end = replay(&s, &r, &plan.actions, 5).unwrap();
        assert_eq!(end.terminal(), Terminal::Success, "scene {}", s.id);
        assert_eq!(end.step_count() as usize, plan.len(), "scene {}", s.id);
    }
}

#[test]
fn crush_scenes_survive_every_crush_pattern() {
    let scenes: Vec<Scene> = builtin_scenes().into_iter().filter(|s| s.category.has_crush()).collect();
    std::thread::scope(|scope| {
        for s in &scenes {
            for factor in [0.5, 0.6, 0.7] {
                scope.spawn(move || {
                    for r in Realization::enumerate(s, factor) {
                        let out = bfs_solve(s, &r).unwrap();
                        let plan = out.plan().unwrap_or_else(|| panic!("scene {} unsolvable under {r:?}", s.id));
                        let end = replay(s, &r, &plan.actions, 1).unwrap();
                        assert_eq!(end.terminal(), Terminal::Success, "scene {} {r:?}", s.id);
                    }
                });
            }
        }
    });
}

#[test]
fn heavy_crush_needs_the_spare_box() {
    let s = builtin_scene(11).unwrap();
    let spare = s.boxes.last().unwrap().id.clone();
    let mut without = s.clone();
    without.boxes.pop();
    let out = bfs_solve(&without, &Realization::all_crush(&without, 0.7)).unwrap();
    assert!(out.plan().is_none());
    let plan = bfs_solve(&s, &Realization::all_crush(&s, 0.7)).unwrap().plan().unwrap().clone();
    assert!(plan.actions.contains(&Action::Grab(spare)));
}

#[test]
fn scene_one_optimum_is_seven_steps() {
    let s = builtin_scene(1).unwrap();
    let plan = bfs_solve(&s, &Realization::zero_crush(&s)).unwrap();
    assert_eq!(plan.plan().unwrap().len(), 7);
}

#[test]
fn dual_banana_costs() {
    let cost = |id: u32, p: &str| {
        let s = builtin_scene(id).unwrap();
        bfs_solve_with(&s, &Realization::zero_crush(&s), reaches_platform(p), DEFAULT_STATE_CAP)
            .unwrap()
            .plan()
            .unwrap()
            .len()
    };
    assert_eq!(cost(4, "P0"), cost(4, "P1"));
    assert_ne!(cost(6, "P0"), cost(6, "P1"));
}

#[test]
fn exported_scenes_load_back() {
    let dir = tempfile::tempdir().unwrap();
    for (path, scene) in export_scenes(dir.path()).unwrap().iter().zip(builtin_scenes()) {
        assert_eq!(Scene::load(path).unwrap(), scene);
    }
}
