from .change import SignificanceChangeReport, significance_change_report
from .correlation import KendallResult, kendall_tau_b, overall_correlation, topicwise_correlation
from .significance import (
    ORDINAL_TESTS,
    TEST_NAMES,
    AnovaDecomposition,
    PairwiseDecision,
    all_pairs,
    friedman,
    friedman_tukey,
    kruskal_wallis,
    kruskal_wallis_tukey,
    one_way_anova,
    one_way_anova_tukey,
    paired_t_test,
    sign_test,
    two_way_anova,
    two_way_anova_tukey,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)
from .studentized_range import studentized_range_cdf, studentized_range_quantile, studentized_range_sf
