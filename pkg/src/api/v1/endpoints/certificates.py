from fastapi import APIRouter

from src.api import deps
from src.schemas.certificate import CertificateSchema, VerificationReport
from src.services.verification import VerificationService

router = APIRouter()


@router.post("/verify", response_model=VerificationReport)
def verify_certificate(document: CertificateSchema) -> VerificationReport:
    """
    Re-check a certificate document. A failed check is a normal response
    with passed = false, not an HTTP error.
    """
    with deps.library_errors():
        return VerificationService.verify_document(document)
