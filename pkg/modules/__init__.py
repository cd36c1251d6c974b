# OneMax mutation-policy modules
