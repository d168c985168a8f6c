"""
Characterization Service - implementability verdicts from the axiom checks
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ratimpl.models.environment import Environment
from ratimpl.models.reports import AxiomReport
from ratimpl.services.axioms import AxiomChecker

logger = logging.getLogger(__name__)

FULL = 'full'
NWA_CRITERION = 'nwa'
RESPONSIVE_CRITERION = 'responsive'


@dataclass
class CharacterizationReport:
    """Verdict of the full characterization plus the criteria that apply"""

    implementable: bool
    verdicts: Dict[str, bool] = field(default_factory=dict)
    reports: Dict[str, AxiomReport] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def applicable(self) -> List[str]:
        return [name for name in self.verdicts if name != FULL]

    @property
    def agree(self) -> bool:
        return all(verdict == self.implementable for verdict in self.verdicts.values())

    def _serialize(self, env: Environment) -> dict:
        return {
            'implementable': self.implementable,
            'criteria': dict(self.verdicts),
            'applicable': self.applicable,
            'agree': self.agree,
            'reports': {axiom: report.summary() for axiom, report in self.reports.items()},
            'notes': list(self.notes),
        }


def characterize(env: Environment, checker: Optional[AxiomChecker] = None) -> CharacterizationReport:
    """Implementability of f with every applicable criterion"""
    checker = checker or AxiomChecker(env)
    reports = {'sem-star-star': checker.check_strict_event_star_star()}
    verdicts = {FULL: reports['sem-star-star'].holds}
    notes = []

    nwa = checker.check_nwa()
    reports['nwa'] = nwa
    if nwa.holds:
        reports['smm-star-star'] = checker.check_strict_maskin_star_star()
        verdicts[NWA_CRITERION] = reports['smm-star-star'].holds

    responsive = checker.check_responsiveness()
    reports['responsiveness'] = responsive
    if responsive.holds:
        reports['strict-event'] = checker.check_strict_event_monotonicity()
        reports['dictator'] = checker.check_dictator_monotonicity()
        verdicts[RESPONSIVE_CRITERION] = reports['strict-event'].holds and reports['dictator'].holds

    if len(env.agents) < 3:
        notes.append('fewer than three agents: the criteria are only known to be sufficient with |I| >= 3')

    report = CharacterizationReport(verdicts[FULL], verdicts, reports, notes)
    if not report.agree:
        logger.warning('%s: criteria disagree %s', env.name or 'environment', verdicts)
    logger.info('%s: %s', env.name or 'environment',
                'implementable' if report.implementable else 'not implementable')
    return report
