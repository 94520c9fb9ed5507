# src/qcsat/main.py

import logging
import time

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from qcsat import __version__
from qcsat.core.config import settings
from qcsat.core.errors import QcsatError
from qcsat.routers import circuits, graphs

# Configuración de logging
logging.basicConfig(
    level=settings.log_level.upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# ============================================================
# CREAR APLICACIÓN
# ============================================================
app = FastAPI(
    title="qcsat API",
    description="Asignaciones clásicas para circuitos cuánticos de treewidth pequeño",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
)

# ============================================================
# MIDDLEWARES
# ============================================================

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.middleware("http")
async def log_requests(request: Request, call_next):
    start_time = time.time()
    logger.info(f"Petición: {request.method} {request.url.path}")
    response = await call_next(request)
    process_time = time.time() - start_time
    logger.info(f"Respuesta: {response.status_code} en {process_time:.3f}s ({request.url.path})")
    return response

# ============================================================
# EXCEPTION HANDLERS
# ============================================================


@app.exception_handler(QcsatError)
async def qcsat_exception_handler(request: Request, exc: QcsatError):
    logger.warning(f"{exc.code}: {exc.message}")
    return JSONResponse(
        status_code=exc.http_status,
        content={"status": "error", "error": exc.to_dict()},
    )


@app.exception_handler(StarletteHTTPException)
async def http_exception_handler(request: Request, exc: StarletteHTTPException):
    logger.warning(f"Error HTTP {exc.status_code}: {exc.detail}")
    return JSONResponse(
        status_code=exc.status_code,
        content={
            "status": "error",
            "error": {
                "code": f"HTTP_{exc.status_code}",
                "message": exc.detail
            }
        }
    )


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    errors = [{"loc": [str(x) for x in err["loc"]], "msg": err["msg"]} for err in exc.errors()]
    logger.warning(f"Cuerpo inválido: {errors}")
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={
            "status": "error",
            "error": {
                "code": "VALIDATION_ERROR",
                "message": "Error de validación en los datos enviados",
                "details": errors
            }
        }
    )


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Error no controlado: {type(exc).__name__}: {exc}", exc_info=True)
    message = str(exc) if settings.app_env == "development" else "Error interno del servidor"
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={
            "status": "error",
            "error": {
                "code": "INTERNAL_SERVER_ERROR",
                "message": message
            }
        }
    )

# ============================================================
# ROUTERS DE LA API
# ============================================================

app.include_router(circuits.router)
app.include_router(graphs.router)

# ============================================================
# ENDPOINTS INFORMATIVOS
# ============================================================


@app.get("/api", tags=["API Info"])
def api_info():
    """Información detallada de la API"""
    return {
        "message": "API qcsat funcionando correctamente",
        "version": __version__,
        "environment": settings.app_env,
        "limits": {
            "max_set_size": settings.max_set_size,
            "oracle_wire_cap": settings.oracle_wire_cap,
            "oracle_assignment_cap": settings.oracle_assignment_cap,
            "epsilon_floor": settings.epsilon_floor,
        },
        "endpoints": {
            "docs": "/docs",
            "health": "/health",
            "circuits": ["/circuits/validate", "/circuits/simulate", "/circuits/satisfy",
                         "/circuits/oracle", "/circuits/generate"],
            "graphs": ["/graphs/decompose"],
        }
    }


@app.get("/health", tags=["Health"])
def health():
    """Estado del servicio"""
    return {
        "status": "healthy",
        "timestamp": time.time(),
        "environment": settings.app_env,
        "version": __version__,
    }
