from __future__ import annotations

from dependency_injector import containers, providers

from .config import AppConfig
from ..core.services import Collider, ExperimentRunner
from ..core.usecases.campaign import CampaignUseCase
from ..core.usecases.fit import FitUseCase
from ..core.usecases.fringes import FringesUseCase
from ..core.usecases.phaseshifts import PhaseShiftsUseCase
from ..core.usecases.veldist import VelDistUseCase
from ..infra.logging import RunLogger
from ..infra.result_store import OutputWriter


class Container(containers.DeclarativeContainer):
    """DI container with Pydantic BaseSettings support."""

    config = providers.Configuration(pydantic_settings=[AppConfig()])

    # Logger (Resource: manages lifecycle with init/shutdown)
    logger = providers.Resource(
        RunLogger,
        logs_dir=config.directories.logs_dir,
        run_id=config.runtime.run_id,
        logger_name=config.logging.logger_name,
        console_output=config.logging.console_output,
        level=config.logging.level,
    )

    # Provenance values are only known once the experiment config is loaded.
    output_writer = providers.Factory(
        OutputWriter,
        logger=logger,
    )

    collider = providers.Factory(
        Collider,
        logger=logger,
        workers=config.runtime.workers,
    )

    runner = providers.Factory(
        ExperimentRunner,
        collider=collider,
        logger=logger,
    )

    # Use cases
    phaseshifts_uc = providers.Factory(
        PhaseShiftsUseCase,
        logger=logger,
    )

    veldist_uc = providers.Factory(
        VelDistUseCase,
        runner=runner,
    )

    fringes_uc = providers.Factory(
        FringesUseCase,
        runner=runner,
    )

    campaign_uc = providers.Factory(
        CampaignUseCase,
        runner=runner,
    )

    fit_uc = providers.Factory(
        FitUseCase,
        runner=runner,
    )
