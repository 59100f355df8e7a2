#!/usr/bin/env python3
"""
Services package initialization.
"""

from .analysis_service import AnalysisService
from .campaign_service import CampaignService
from .simulation_service import SimulationService

__all__ = ["AnalysisService", "CampaignService", "SimulationService"]
