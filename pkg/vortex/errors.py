"""VORTEX 예외 계층"""


class VortexError(Exception):
    """VORTEX 최상위 에러"""
    pass


class ConfigError(VortexError):
    """실행 설정 오류"""
    pass


class EnvironmentSpecError(VortexError, ValueError):
    """환경 명세 파일 오류"""
    pass


class SimulationError(VortexError):
    """시뮬레이션 전제조건 위반 (예산 초과, 잘못된 arm 인덱스 등)"""
    pass


class SolverError(VortexError):
    """솔버 입력 오류 또는 처리 불가능한 인스턴스"""
    pass


class MetricsError(VortexError):
    """지표 계산 오류"""
    pass


class UndefinedDistributionError(MetricsError):
    """pull 이 한 번도 없어서 분포가 정의되지 않음"""
    pass


class ShapingError(VortexError):
    """shaping 계산 오류"""
    pass


class ProposalError(VortexError):
    """shaper 백엔드 제안 실패"""
    pass


class ScriptExhaustedError(ProposalError):
    """스크립트에 남은 벡터가 없음"""
    pass


class OutputParseError(ProposalError):
    """원격 응답에서 JSON 객체를 추출하지 못함"""
    pass


class IncompleteOutputError(ProposalError):
    """응답에 누락된 클래스가 있음"""
    pass


class ShapingValidationError(ProposalError):
    """shaping 벡터 검증 실패"""
    pass


class RemoteRequestError(ProposalError):
    """원격 요청 실패 (재시도 소진)"""
    pass


class ArtifactError(VortexError):
    """실행 결과 파일 입출력 오류"""
    pass


class RunAbortedError(VortexError):
    """실행 중단 (부분 결과는 result 에 보존)"""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
