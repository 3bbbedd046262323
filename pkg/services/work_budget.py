import threading
from collections import defaultdict

from services.config import BoostConfig
from services.errors import BudgetExceededError
from utils.logging import log_structured


class WorkBudget:
    """
    Per-run cap on D_0 evaluations. One D_N draw costs 2^N of them, so a sample run of
    `trials` draws costs 2^N * trials. Levels above LEVEL_CAP need an explicit override.
    """
    _lock = threading.Lock()
    _spent = defaultdict(int)  # run_id -> D_0 evaluations charged so far

    @staticmethod
    def cost(N, trials=1):
        return (1 << N) * trials

    @classmethod
    def allow(cls, run_id, N, trials, budget=None, allow_large_level=False):
        """(ok, reason); charges the run when ok."""
        budget = BoostConfig.work_budget() if budget is None else budget
        if N > BoostConfig.LEVEL_CAP and not allow_large_level:
            reason = (f"N={N} exceeds the level cap of {BoostConfig.LEVEL_CAP}; "
                      f"one D_N draw alone costs 2^{N} D_0 evaluations (pass allow_large_level to override)")
            log_structured('WARN', 'Work budget refused', run_id, N=N, reason='level_cap')
            return False, reason
        cost = cls.cost(N, trials)
        if run_id is None:
            # untracked call: check this request alone
            if cost > budget:
                return False, (f"sampling {trials} draws at N={N} costs 2^{N} * {trials} = {cost} "
                               f"D_0 evaluations, budget {budget}")
            return True, None
        with cls._lock:
            spent = cls._spent[run_id]
            if spent + cost > budget:
                reason = (f"sampling {trials} draws at N={N} costs 2^{N} * {trials} = {cost} D_0 evaluations, "
                          f"budget {budget} ({spent} already spent)")
                log_structured('WARN', 'Work budget refused', run_id, N=N, trials=trials, cost=cost, budget=budget)
                return False, reason
            cls._spent[run_id] = spent + cost
        return True, None

    @classmethod
    def require(cls, run_id, N, trials, budget=None, allow_large_level=False):
        ok, reason = cls.allow(run_id, N, trials, budget, allow_large_level)
        if not ok:
            raise BudgetExceededError(reason)

    @classmethod
    def get_status(cls, run_id):
        with cls._lock:
            return {'spent': cls._spent[run_id]}

    @classmethod
    def reset(cls, run_id=None):
        with cls._lock:
            if run_id is None:
                cls._spent.clear()
            else:
                cls._spent.pop(run_id, None)
