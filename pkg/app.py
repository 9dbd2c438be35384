#!/usr/bin/env python3
"""
Flask Web Service for the twoweight lab
Provides REST API endpoints for constants, splitting reports and in-memory runs
"""

import logging
from typing import Any, Dict

import numpy as np
from dotenv import load_dotenv
from flask import Flask, jsonify, request
from flask_cors import CORS
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from constants.suite import EstimatorBudget, pair_constants
from dyadic.families import weight_from_spec
from dyadic.tree import DyadicTree
from explorer.config import ExperimentConfig, format_validation_error
from explorer.reporting import __version__
from explorer.runner import run
from forms.split import split_form
from models.data_models import GoodnessParams, WeightedFunction, WeightPair
from models.errors import TwoWeightError
from models.reports import to_jsonable
from providers import FamilyRegistry

# Load environment variables
load_dotenv()

# Setup logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Create Flask app
app = Flask(__name__)
CORS(app)  # Enable CORS for all routes

registry = FamilyRegistry()

ENDPOINTS = {
    "/": "API information and health check",
    "/families": "Weight-family catalogue",
    "/constants": "All constants of a weight pair with provenance (POST)",
    "/split": "Splitting cascade of seeded random test functions (POST)",
    "/run": "Run an experiment config in memory (POST)",
}


class PairRequest(BaseModel):
    """Two weight specs on one tree"""

    model_config = ConfigDict(extra="forbid")

    sigma: Dict[str, Any] = Field(description="Weight spec JSON of σ")
    w: Dict[str, Any] = Field(description="Weight spec JSON of w")
    depth: int = Field(default=6, ge=1, le=12, description="Tree depth")
    epsilon: float = Field(default=0.2, gt=0.0, lt=0.5, description="Goodness exponent")
    r: int = Field(default=2, ge=2, description="Goodness gap")
    seed: int = Field(default=0, description="Sampling seed")

    def pair(self) -> WeightPair:
        sigma = weight_from_spec({"depth": self.depth, "side": "sigma", **self.sigma})
        w = weight_from_spec({"depth": self.depth, "side": "w", **self.w})
        return WeightPair(sigma, w)

    @property
    def params(self) -> GoodnessParams:
        return GoodnessParams(self.epsilon, self.r)

    @property
    def tree(self) -> DyadicTree:
        return DyadicTree(self.depth)


def error_response(e: Exception, action: str):
    """400 for domain and validation errors, 500 otherwise"""
    if isinstance(e, ValidationError):
        return jsonify({"success": False, "error": format_validation_error(e, "<request>")}), 400
    if isinstance(e, TwoWeightError):
        return jsonify({"success": False, "error": str(e)}), 400
    logger.error(f"Error {action}: {e}")
    return jsonify({"success": False, "error": str(e)}), 500


@app.route("/", methods=["GET"])
def home():
    """Health check and API information"""
    return jsonify(
        {
            "service": "twoweight lab API",
            "version": __version__,
            "status": "running",
            "endpoints": ENDPOINTS,
            "available_families": len(registry.families),
        }
    )


@app.route("/families", methods=["GET"])
def get_families():
    """Get the weight-family catalogue"""
    try:
        families = registry.get_available_families()
        return jsonify({"success": True, "families": families, "count": len(families), "defaults": registry.defaults})
    except Exception as e:
        return error_response(e, "getting families")


@app.route("/constants", methods=["POST"])
def get_constants():
    """Every named constant of a pair"""
    try:
        body = PairRequest(**(request.get_json(silent=True) or {}))
        report = pair_constants(body.pair(), body.tree, body.params, body.seed, budget=EstimatorBudget())
        return jsonify({"success": True, "depth": body.depth, **report.to_dict()})
    except Exception as e:
        return error_response(e, "computing constants")


@app.route("/split", methods=["POST"])
def get_split():
    """SplitReport for seeded random f and φ"""
    try:
        body = PairRequest(**(request.get_json(silent=True) or {}))
        pair = body.pair()
        rng = np.random.default_rng(body.seed)
        f = WeightedFunction(pair.sigma, rng.standard_normal(len(pair.sigma)))
        phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))
        report = split_form(pair, f, phi, body.params, body.tree)
        return jsonify({"success": True, "depth": body.depth, "seed": body.seed, "report": report.to_dict()})
    except Exception as e:
        return error_response(e, "splitting form")


@app.route("/run", methods=["POST"])
def run_experiment():
    """Run an ExperimentConfig without writing files"""
    try:
        data = request.get_json(silent=True) or {}
        config = ExperimentConfig(**{**data, "out": None})
        report = run(config)
        return jsonify(
            {
                "success": True,
                "exit_code": report.exit_code,
                "summary": report.summary(),
                "constants": to_jsonable(report.constants_rows),
                "ratios": to_jsonable(report.ratio_rows),
                "decay_exponent": report.decay_exponent,
                "failures": report.to_dict()["failures"],
                "wall_clock": report.wall_clock,
                "config": report.config,
            }
        )
    except Exception as e:
        return error_response(e, "running experiment")


@app.errorhandler(404)
def not_found(error):
    """Handle 404 errors"""
    return (
        jsonify({"success": False, "error": "Endpoint not found", "available_endpoints": list(ENDPOINTS)}),
        404,
    )


@app.errorhandler(500)
def internal_error(error):
    """Handle 500 errors"""
    return jsonify({"success": False, "error": "Internal server error"}), 500


if __name__ == "__main__":
    print("🚀 Starting twoweight lab Flask API")
    print("=" * 60)

    families = registry.get_available_families()
    print(f"📋 Weight Families: {len(families)}")
    for name, description in families.items():
        print(f"  • {name}: {description}")

    print("\n🌐 API Endpoints:")
    print("  • GET  /          - API information")
    print("  • GET  /families  - Weight-family catalogue")
    print("  • POST /constants - Constants of a pair")
    print("  • POST /split     - Splitting cascade report")
    print("  • POST /run       - In-memory experiment run")

    print(f"\n🔧 Starting server on http://0.0.0.0:5000")
    print("=" * 60)

    app.run(host="0.0.0.0", port=5000, debug=False)  # nosec B104
