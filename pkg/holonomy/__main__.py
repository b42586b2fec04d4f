from holonomy.main import main

main()
