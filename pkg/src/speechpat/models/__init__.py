from .cart import CartTree, build_cart
from .ensemble import (
    ADABOOST, GBM_CLASSIFIER, GBM_REGRESSOR, RANDOM_FOREST, RANDOM_FOREST_REGRESSOR,
    TreeEnsembleModel, decision_function, ensemble_predict, fit_adaboost, fit_random_forest,
    gbm_fit, logistic_loss, mdi_importance, predict_labels, sigmoid,
)
from .io import load_model, save_model
from .naive_bayes import GaussianNbModel, fit_gaussian_nb
