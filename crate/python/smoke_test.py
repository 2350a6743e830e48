"""Smoke test for the compiled extension.

Build and run from the repository root:

    cargo build --release -p miniverse-py --features extension-module
    cp target/release/libminiverse.so python/miniverse.so
    python3 python/smoke_test.py
"""

import os
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import miniverse as mv  # noqa: E402


def as_array(d):
    return np.frombuffer(d["image"], dtype=np.uint8).reshape(d["shape"])


def main():
    print("environments:", ", ".join(mv.env_ids()))

    for env_id in mv.env_ids():
        env = mv.make(env_id)
        obs, info = env.reset(seed=0)
        img = as_array(obs)
        assert img.shape == env.observation_shape, (env_id, img.shape)
        rng = np.random.default_rng(0)
        total, steps = 0.0, 0
        while True:
            obs, reward, terminated, truncated, info = env.step(int(rng.integers(env.n_actions)))
            total += reward
            steps += 1
            if terminated or truncated:
                break
        assert steps <= env.max_steps
        frame = as_array(env.render("top_down"))
        print(f"{env_id:24s} obs {img.shape} steps {steps:3d} reward {total:.3f} top-down {frame.shape}")

    a, _ = mv.make("World3D-FourRooms").reset(seed=11)
    b, _ = mv.make("World3D-FourRooms").reset(seed=11)
    assert np.array_equal(as_array(a), as_array(b)), "same seed, same first frame"

    oh, _ = mv.make("Grid-GoToObj-8x8", one_hot_mission=True).reset(seed=1)
    assert sum(oh["mission"]) == 1

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "smoke.epjsonl")
        rec = mv.Recorder("Grid-FourRooms", path, seed=3)
        rec.reset(3)
        for a in [2, 2, 0, 2, 1, 2]:
            rec.step(a)
        rec.close()
        assert mv.replay_verify(path)
        print("recorded log replays:", path.rsplit("/", 1)[-1])

    print("key mapping:", dict(mv.assign_keys(42, 3)))
    gain = mv.transfer_improvement(119592.0, 115000.0)
    print(f"transfer improvement {100 * gain:.3f}%")
    print("OK")


if __name__ == "__main__":
    main()
