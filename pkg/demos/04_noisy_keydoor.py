"""
Playing KeyDoor under reward noise
==================================

A few episodes of the key-and-door game for the mean-based baseline and the
ordinal search, with and without Gaussian noise on every observed reward.
The repetition count is tiny so the script finishes in a couple of minutes;
``configs/keydoor_noise.json`` holds the full experiment.
"""
import time

from ordinal_bucketing import EnvSpec, SearchConfig, make_game, play_episode

spec = EnvSpec("KeyDoor", width=7, height=7, n_enemies=1, tick_limit=100)
game = make_game(spec)

# one traced episode first
trajectory = []
result = play_episode(game, SearchConfig("OMCTS-exact", budget=300, seed=0), env_seed=0, trajectory=trajectory)
print(result)
print("first moves (tick, action, delta, outcome):", trajectory[:5])

reps = 4
for variant in ("MCTS", "OMCTS-exact", "OMCTS-2Log3"):
    for sigma in (0, 10):
        t0 = time.time()
        runs = [play_episode(game, SearchConfig(variant, budget=300, sigma=sigma, seed=s), env_seed=s)
                for s in range(reps)]
        wins = sum(r.win for r in runs)
        score = sum(r.score for r in runs) / reps
        print(f"{variant:<12} sigma={sigma:<3} wins {wins}/{reps}  mean score {score:.2f}  "
              f"({time.time() - t0:.0f}s)")
