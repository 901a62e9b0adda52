use tevir::env::{
    encode, expert_rollout, scripted_expert, Env, EnvAction, TaskId, TaskSpec, HORIZON,
};
use tevir::Error;

fn task(id: TaskId) -> TaskSpec {
    TaskSpec::get(id)
}

#[test]
fn reset_is_deterministic() {
    for id in TaskId::ALL {
        let env = Env::new(task(id));
        let (a, za) = env.reset(17);
        let (b, zb) = env.reset(17);
        assert_eq!(a, b);
        assert_eq!(za, zb);
        assert_eq!(encode(env.task(), &a), za);
    }
}

#[test]
fn canonical_task_has_a_fixed_start() {
    for id in TaskId::ALL {
        let env = Env::new(task(id).canonical());
        let (first, _) = env.reset(0);
        for seed in 1..50 {
            assert_eq!(env.reset(seed).0, first);
        }
    }
}

#[test]
fn resets_stay_inside_declared_ranges() {
    for id in TaskId::ALL {
        let spec = task(id);
        let env = Env::new(spec.clone());
        for seed in 0..1000 {
            let (s, _) = env.reset(seed);
            assert!(spec.gripper_x.contains(s.gripper[0]), "{id:?} seed {seed}");
            assert!(spec.gripper_y.contains(s.gripper[1]), "{id:?} seed {seed}");
            assert!(spec.object_x.contains(s.object[0]), "{id:?} seed {seed}");
            assert!(spec.object_y.contains(s.object[1]), "{id:?} seed {seed}");
            assert_eq!(s.t, 0);
            assert!(!spec.is_success(&s), "{id:?} seed {seed} starts solved");
        }
    }
}

#[test]
fn zero_action_only_advances_time() {
    for id in TaskId::ALL {
        let env = Env::new(task(id));
        let (s, _) = env.reset(3);
        let out = env.step(&s, &EnvAction::new(0.0, 0.0, s.aperture)).unwrap();
        let mut expected = s.clone();
        expected.t += 1;
        assert_eq!(out.state, expected);
    }
}

#[test]
fn transitions_are_deterministic() {
    let env = Env::new(task(TaskId::PushBlock));
    let (s, _) = env.reset(5);
    let a = EnvAction::new(0.05, -0.02, 0.4);
    assert_eq!(env.step(&s, &a).unwrap(), env.step(&s, &a).unwrap());
}

#[test]
fn reach_succeeds_within_tolerance() {
    let spec = task(TaskId::Reach);
    let env = Env::new(spec.clone());
    let (mut s, _) = env.reset(9);
    s.gripper = [s.object[0] + 0.065, s.object[1]];
    let out = env.step(&s, &EnvAction::new(-0.05, 0.0, 1.0)).unwrap();
    assert_eq!(out.sparse, 1.0);
    assert!(out.done);
    s.gripper = [s.object[0] + 0.08, s.object[1]];
    assert_eq!(env.step(&s, &EnvAction::new(-0.05, 0.0, 1.0)).unwrap().sparse, 0.0);
}

#[test]
fn collinear_push_moves_the_block() {
    let env = Env::new(task(TaskId::PushBlock));
    let (s, _) = env.reset(2);
    let mut s = s;
    s.gripper = [s.object[0] - 0.06, s.object[1]];
    let before = s.object;
    let mut moved = false;
    for _ in 0..3 {
        s = env.step(&s, &EnvAction::new(0.05, 0.0, 1.0)).unwrap().state;
        moved |= s.object[0] > before[0];
        assert_eq!(s.object[1], before[1]);
    }
    assert!(moved, "block never moved");
}

#[test]
fn latents_are_unit_norm_per_view() {
    for id in TaskId::ALL {
        let (_, z) = Env::new(task(id)).reset(11);
        for v in z.vectors() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn top_view_cannot_see_articulation() {
    let spec = task(TaskId::OpenDrawer);
    let (s, _) = Env::new(spec.clone()).reset(4);
    let mut opened = s.clone();
    opened.articulation += 0.1;
    let a = encode(&spec, &s);
    let b = encode(&spec, &opened);
    assert_eq!(a.view("top"), b.view("top"));
    assert_ne!(a.view("left"), b.view("left"));
}

#[test]
fn stepping_a_finished_episode_is_an_error() {
    let env = Env::new(task(TaskId::Reach));
    let (mut s, _) = env.reset(0);
    s.t = HORIZON;
    assert!(matches!(
        env.step(&s, &EnvAction::new(0.0, 0.0, 1.0)),
        Err(Error::Usage(_))
    ));
}

#[test]
fn expert_solves_every_task_from_200_resets() {
    for id in TaskId::ALL {
        let spec = task(id);
        for seed in 0..200 {
            let (start, _) = Env::new(spec.clone()).reset(seed);
            let path = expert_rollout(&spec, &start);
            let end = path.last().unwrap();
            assert!(spec.is_success(end), "{id:?} seed {seed}");
            assert!(path.len() <= HORIZON + 1, "{id:?} seed {seed}: {} states", path.len());
        }
    }
}

#[test]
fn expert_stops_at_success() {
    for id in TaskId::ALL {
        let spec = task(id);
        let (start, _) = Env::new(spec.clone()).reset(1);
        let end = expert_rollout(&spec, &start).last().unwrap().clone();
        assert!(scripted_expert(&spec, &end).is_zero_velocity());
    }
}
