from pivotcert.cli import main

raise SystemExit(main())
