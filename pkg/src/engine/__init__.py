from src.engine.report_generator import VerificationReportGenerator
from src.engine.verification_suite import GROUPS, VerificationSuite

__all__ = ['GROUPS', 'VerificationReportGenerator', 'VerificationSuite']
