from hypcount.cli import main

raise SystemExit(main())
