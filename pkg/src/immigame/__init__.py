"""Immigration Games: two-colour life-like games, rule triples, and coevolution."""

from .analysis import (
    classify_run,
    emit_table1_report,
    external_fitness,
    population_external_fitness,
    random_opponent_like,
)
from .classifier import (
    Triple,
    classify_rule,
    classify_trial,
    predict_open,
    random_boxed_seed,
)
from .engine import (
    GameOutcome,
    MatchResult,
    MatchRunner,
    merge_colors,
    place_seeds,
    play_game,
    play_match,
    score,
    step,
    time_limit,
)
from .evolution import (
    EvolutionConfig,
    EvolutionRun,
    Individual,
    Population,
    RunLog,
    crossover,
    fuse,
    init_population,
    insert_individual,
    internal_fitness,
    mutate_fixed,
    mutate_variable,
    run_evolution,
    select_parent,
    spawn_offspring,
)
from .patterns import BLUE, DEAD, RED, SeedPattern, Torus
from .rules import (
    Rule,
    enumerate_immigration_rules,
    format_rule,
    group1_rules,
    group3_candidates,
    parse_rule,
    sample_group2,
    sample_group3,
)

__version__ = "0.1.0"
